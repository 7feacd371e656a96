"""Plain data types: density matrices, probes, families, reports and scans."""
