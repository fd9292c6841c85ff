# Deep listwise context re-ranking toolkit
__version__ = "1.0.0"
