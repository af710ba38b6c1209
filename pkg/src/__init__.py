#!/usr/bin/env python3
"""
vecfont: style transfer between vector glyphs.
Each glyph is a list of closed SVG paths; a hierarchical Transformer encodes a
style reference and redraws a content glyph in that style.
"""

__version__ = "1.0.0"
