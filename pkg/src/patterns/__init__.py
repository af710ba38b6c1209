"""Cross-cutting error handling and metrics logging."""
