"""
Shipped data for maskcert: the homoglyph map and a small synonym table under
assets/, and the synthetic corpus generator.
"""
