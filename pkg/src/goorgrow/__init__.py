"""Go-or-grow invasion model toolkit."""
