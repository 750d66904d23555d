"""vass-geometry - geometric dimension, bounded witness search and gadgets for VASS."""

__version__ = '0.1.0'
