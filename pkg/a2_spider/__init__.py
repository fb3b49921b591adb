"""Exact A2 spider engine for colored sl3 link invariants and their tails."""
