# src/core/stats/__init__.py
