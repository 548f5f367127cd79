"""Command-line front end for the Evans-function toolkit."""
