# app/shared/__init__.py
"""Shared Package"""
