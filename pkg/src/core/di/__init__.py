# src/core/di/__init__.py