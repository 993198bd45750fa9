"""Terminal output and log handler setup."""
