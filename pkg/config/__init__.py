"""Configuration module for the Evans-function toolkit."""
