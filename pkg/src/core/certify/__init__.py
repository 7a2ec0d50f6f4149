# src/core/certify/__init__.py
