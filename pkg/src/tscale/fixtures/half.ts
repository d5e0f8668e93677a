# the lattice 0.5 Z from 0
window 0 0
tail uniform 0.5
