# Coprime Toolkit: coprimality of elliptic curve reductions
__version__ = "1.0.0"

SCHEMA_VERSION = "1.0"
