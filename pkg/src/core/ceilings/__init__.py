# src/core/ceilings/__init__.py
