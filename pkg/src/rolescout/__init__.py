"""rolescout: identify football players' tactical roles from match event data."""

__version__ = "0.1.0"
