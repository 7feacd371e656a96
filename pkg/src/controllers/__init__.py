"""Domain logic: states, criteria, oracle, optimizer and scans."""
