"""Allow `python -m notchcast` as an alternative to the console script."""

from .cli import entry_point

if __name__ == "__main__":
    entry_point()
