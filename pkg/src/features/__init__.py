"""
Features module.

Contains all feature modules organized by domain.
Each feature is self-contained with its own domain, services
and infrastructure layers.
"""
