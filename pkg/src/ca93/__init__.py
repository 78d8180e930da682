"""Two-state weakly universal cellular automaton on the hyperbolic tessellation {9,3}."""
