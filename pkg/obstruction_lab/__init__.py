"""
Numerical laboratory for the singular Yamabe obstructions of hypersurfaces.
"""
