# Independent reference of Philox4x32-10 per Salmon et al. 2011 (Random123).
M0 = 0xD2511F53
M1 = 0xCD9E8D57
W0 = 0x9E3779B9
W1 = 0xBB67AE85
MASK = 0xFFFFFFFF

def mulhilo(a, b):
    p = a * b
    return (p >> 32) & MASK, p & MASK

def one_round(ctr, key):
    hi0, lo0 = mulhilo(M0, ctr[0])
    hi1, lo1 = mulhilo(M1, ctr[2])
    return [hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0]

def philox4x32_10(ctr, key):
    ctr = list(ctr); key = list(key)
    for r in range(10):
        if r > 0:
            key = [(key[0] + W0) & MASK, (key[1] + W1) & MASK]
        ctr = one_round(ctr, key)
    return ctr

z = philox4x32_10([0,0,0,0],[0,0])
print("zeros :", " ".join(f"{v:08x}" for v in z))
f = philox4x32_10([MASK]*4,[MASK]*2)
print("ones  :", " ".join(f"{v:08x}" for v in f))
c = philox4x32_10([0x243f6a88,0x85a308d3,0x13198a2e,0x03707344],[0xa4093822,0x299f31d0])
print("pi    :", " ".join(f"{v:08x}" for v in c))
