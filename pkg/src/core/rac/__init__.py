# src/core/rac/__init__.py
