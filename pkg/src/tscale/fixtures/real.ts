# the half line [0, inf)
window 0 0
tail continuous
