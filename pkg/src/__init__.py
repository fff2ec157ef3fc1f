"""Motion-prompted heatmap tracking of small fast balls."""
