# src/core/base/__init__.py