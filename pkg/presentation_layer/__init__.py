# presentation_layer/__init__.py

from .CommandLineUI import CommandLineUI

__all__ = ['CommandLineUI']
