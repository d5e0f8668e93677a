# the integers from 0
window 0 0
tail uniform 1
