# isolated points at 0 and 0.5, then [1, inf)
window 0 1
points 0 0.5
tail continuous
