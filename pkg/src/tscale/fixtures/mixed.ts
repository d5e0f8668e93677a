# [0, 1], two isolated points, then the integers from 3
window 0 3
interval 0 1
points 1.5 2
tail uniform 1
