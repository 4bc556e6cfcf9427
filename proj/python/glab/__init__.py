"""Indexed grammars, simple unification grammars and the U transformation."""

from ._glab import *  # noqa: F401,F403
from ._glab import GlabError, run_cli


def word(symbols):
    """Display form of a word given as a list of symbols."""
    if all(len(s) == 1 for s in symbols):
        return "".join(symbols)
    return " ".join(symbols)


def main(argv=None):
    import sys

    code, out, err = run_cli(list(sys.argv[1:] if argv is None else argv))
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code
