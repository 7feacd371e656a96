"""Stateless helpers: tensor arithmetic, partitions, errors and report files."""
