# Shared helpers live in helpers.py / oracles.py next to this file; having a
# conftest here puts the tests directory on sys.path for those imports.
