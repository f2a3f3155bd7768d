"""Bundled workspace layouts."""
