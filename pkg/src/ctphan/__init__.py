"""Curtis-Tits and Phan amalgams over small finite fields."""

__version__ = "0.1.0"
