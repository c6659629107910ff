"""HMPNN lab: heterogeneous message passing for AML on synthetic transaction graphs."""
