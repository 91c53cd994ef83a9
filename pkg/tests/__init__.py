"""
Tests package for the univoque dimension project.
"""
