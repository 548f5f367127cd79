"""Services module for the Evans-function toolkit."""
