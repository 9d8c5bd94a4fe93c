"""From-scratch CNN engine and diagnosis service for 2-D lung X-ray screening."""

__version__ = "0.1.0"
