__appname__ = 'CoverKMS'
__version__ = '1.0.0'
