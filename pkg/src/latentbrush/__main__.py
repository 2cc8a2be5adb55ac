"""Allow ``python -m latentbrush`` to behave like the ``lp`` command."""

from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())
