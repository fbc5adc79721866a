"""Shared logging, error handling and file helpers."""
