# powers of two from 1
window 1 1
tail geometric 2
