"""StairKit test suite"""
