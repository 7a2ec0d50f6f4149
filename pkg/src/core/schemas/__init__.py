# src/core/schemas/__init__.py