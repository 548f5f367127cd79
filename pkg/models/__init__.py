"""Models module for the Evans-function toolkit."""
