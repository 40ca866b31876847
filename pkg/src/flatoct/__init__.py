"""Reachability analysis for recursive programs with octagonal relations under bounded control."""
