"""Term tables for the two long fourth-order coefficient polynomials.

Each entry is ``(integer coefficient, exponent tuple)``; the LaTeX line each
group of terms was transcribed from is kept as a comment above it.
"""

# D2Q13 zeta_4 numerator, exponents over (alpha, a, sigma3, sigma4)
ZETA4_D2Q13_TERMS = (
    # 525433428 \, a \, \sigma_3 \, \sigma_4
    (525433428, (0, 1, 1, 1)),
    # \,+\,  576972000 \, \, \alpha^2  \sigma_3^2
    (576972000, (2, 0, 2, 0)),
    # +\, 18001526400 \,  \alpha  \, \sigma_3^3 \, \sigma_4
    (18001526400, (1, 0, 3, 1)),
    # \,+\, 18001526400 \,  \alpha \,   \sigma_3 \,   \sigma_4^3
    (18001526400, (1, 0, 1, 3)),
    # +\, 65975 \, a^2 \,   \alpha \, \sigma_3   \, \sigma_4
    (65975, (1, 2, 1, 1)),
    # +\, 170558856 \, a \, \sigma_4^2
    (170558856, (0, 1, 0, 2)),
    # \,-\, 334055628 \, a \, \sigma_3^2
    (-334055628, (0, 1, 2, 0)),
    # \,-\, 858312 \, a^2 \, \sigma_4^2
    (-858312, (0, 2, 0, 2)),
    # \,-\, 159243217380 \, \sigma_3 \, \sigma_4
    (-159243217380, (0, 0, 1, 1)),
    # +\, 75143778660 \, \sigma_3^2 \,
    (75143778660, (0, 0, 2, 0)),
    # +\, 18001526400 \, \alpha  \, \sigma_3^2   \, \sigma_4^2
    (18001526400, (1, 0, 2, 2)),
    # \,-\, 77472720 \,   a \, \alpha  \, \sigma_3^3  \, \sigma_4
    (-77472720, (1, 1, 3, 1)),
    # -\, 77472720 \, a \, \alpha  \,   \sigma_3^2   \,  \sigma_4^2
    (-77472720, (1, 1, 2, 2)),
    # \,-\, 77472720  \, a \, \alpha   \,  \sigma_3 \,     \sigma_4^3
    (-77472720, (1, 1, 1, 3)),
    # +\, 504042739200  \, \sigma_3  \, \sigma_4^3
    (504042739200, (0, 0, 1, 3)),
    # +\, 129610990080 \, \sigma_3^3 \, \sigma_4
    (129610990080, (0, 0, 3, 1)),
    # \,+\, 129610990080 \, \sigma_3^2  \, \sigma_4^2
    (129610990080, (0, 0, 2, 2)),
    # +\, 858312 \, a^2  \, \sigma_3 \, \sigma_4
    (858312, (0, 2, 1, 1)),
    # +\, 22940190 \, a \, \alpha  \,   \sigma_3  \, \sigma_4
    (22940190, (1, 1, 1, 1)),
    # \,+\, 17841109925  \, \alpha  \, \sigma_3^2
    (17841109925, (1, 0, 2, 0)),
    # \,-\, 65975  \, a^2 \, \alpha \,  \sigma_4^2
    (-65975, (1, 2, 0, 2)),
    # + \, 13110175 \, a  \, \alpha  \, \sigma_4^2
    (13110175, (1, 1, 0, 2)),
    # \,-\, 3461832000 \, \alpha^2  \, \sigma_3^4
    (-3461832000, (2, 0, 4, 0)),
    # \,-\, 85853433600 \, \alpha  \, \sigma_3^4
    (-85853433600, (1, 0, 4, 0)),
    # -\, 2483100 \, a  \, \alpha^2   \, \sigma_3^2
    (-2483100, (2, 1, 2, 0)),
    # \,-\, 78263065 \,  a \, \alpha    \, \sigma_3^2
    (-78263065, (1, 1, 2, 0)),
    # \,-\, 438683351040 \, \sigma_3^4
    (-438683351040, (0, 0, 4, 0)),
    # +\, 369485280 \, a \, \alpha  \, \sigma_3^4
    (369485280, (1, 1, 4, 0)),
    # \,+\, 14898600 \, a  \, \alpha^2 \, \sigma_3^4
    (14898600, (2, 1, 4, 0)),
    # \, +\, 1887950592 \, a  \, \sigma_3^4
    (1887950592, (0, 1, 4, 0)),
    # -\, 557803584 \, a \, \sigma_3^2 \, \sigma_4^2
    (-557803584, (0, 1, 2, 2)),
    # \,-\, 2169236160 \, a \, \sigma_3   \, \sigma_4^3
    (-2169236160, (0, 1, 1, 3)),
    # \,-\, 557803584  \, a \, \sigma_3^3 \, \sigma_4
    (-557803584, (0, 1, 3, 1)),
    # -\, 8032585925 \,  \alpha  \,  \sigma_3 \, \sigma_4  \Big) \, .
    (-8032585925, (1, 0, 1, 1)),
)

# D3Q27 N_4, exponents over (alpha, sigma5, psi)
N4_TERMS = (
    # - 526848 -\, 13105344 \, \sigma_5^2 +\, 56334931 \, \psi^6 \, \alpha -\, 3413088 \, \psi^2
    (-526848, (0, 0, 0)), (-13105344, (0, 2, 0)), (56334931, (1, 0, 6)), (-3413088, (0, 0, 2)),
    # +\, 29925576 \, \psi^3
    (29925576, (0, 0, 3)),
    # +\, 44310000 \, \sigma_5^2 \,  \psi^3 \, \alpha^2
    (44310000, (2, 2, 3)),
    # +\,  2458624 \, \alpha^2
    (2458624, (2, 0, 0)),
    # -\, 7776 \, \sigma_5^2 \, \psi^{12}
    (-7776, (0, 2, 12)),
    # +\, 116153808 \, \sigma_5^2 \, \psi^7
    (116153808, (0, 2, 7)),
    # +\, 16213680 \,    \sigma_5^2 \, \psi^9
    (16213680, (0, 2, 9)),
    # -\, 56871552 \, \sigma_5^2 \, \psi^8
    (-56871552, (0, 2, 8)),
    # -\, 2696976 \, \sigma_5^2 \, \psi^{10}
    (-2696976, (0, 2, 10)),
    # +\, 803992 \, \psi \,      \alpha
    (803992, (1, 0, 1)),
    # -\, 16250948 \, \psi^2 \, \alpha
    (-16250948, (1, 0, 2)),
    # +\, 15057742 \, \psi^3 \, \alpha
    (15057742, (1, 0, 3)),
    # +\, 236520 \, \sigma_5^2 \, \psi^{11}
    (236520, (0, 2, 11)),
    # -\,    47554008 \, \sigma_5^2 \, \psi^5 \, \alpha^2
    (-47554008, (2, 2, 5)),
    # +\, 414648 \, \sigma_5^2 \, \psi^9 \, \alpha^2
    (414648, (2, 2, 9)),
    # +\, 5924856 \,  \sigma_5^2 \, \psi^7 \, \alpha^2
    (5924856, (2, 2, 7)),
    # -\, 3520104 \, \sigma_5^2 \, \psi^8 \, \alpha^2
    (-3520104, (2, 2, 8)),
    # +\, 7776 \, \sigma_5^2 \, \psi^{12} \,  \alpha^2
    (7776, (2, 2, 12)),
    # -\, 73224 \, \sigma_5^2 \, \psi^{11} \, \alpha^2
    (-73224, (2, 2, 11)),
    # -\, 1805156 \, \psi^8 \, \alpha^2
    (-1805156, (2, 0, 8)),
    # -\, 1316084 \, \psi^7 \,     \alpha^2
    (-1316084, (2, 0, 7)),
    # +\, 13802956 \, \psi^6 \, \alpha^2
    (13802956, (2, 0, 6)),
    # -\, 29063324 \, \psi^5 \, \alpha^2
    (-29063324, (2, 0, 5)),
    # +\, 25708132 \, \psi^4 \, \alpha^2
    (25708132, (2, 0, 4)),
    # -\,   1230152 \, \psi^3 \, \alpha^2
    (-1230152, (2, 0, 3)),
    # +\, 3742816 \, \alpha^2 \, \psi
    (3742816, (2, 0, 1)),
    # +\, 27756 \, \psi^{11} \, \alpha^2
    (27756, (2, 0, 11)),
    # -\, 3429 \, \psi^{11} \,    \alpha
    (-3429, (1, 0, 11)),
    # -\, 187851264 \, \sigma_5^2 \, \alpha^2 \, \psi^2
    (-187851264, (2, 2, 2)),
    # +\, 198524928 \, \sigma_5^2 \, \alpha^2 \, \psi
    (198524928, (2, 2, 1)),
    # +\, 195048  \, \sigma_5^2 \, \psi^{10} \, \alpha^2
    (195048, (2, 2, 10)),
    # -\, 12827088 \, \psi^4
    (-12827088, (0, 0, 4)),
    # +\, 100016448 \, \sigma_5^2 \, \psi
    (100016448, (0, 2, 1)),
    # -\, 10762392 \,     \sigma_5^2 \, \psi^3
    (-10762392, (0, 2, 3)),
    # -\, 287184 \, \sigma_5^2 \, \psi^5
    (-287184, (0, 2, 5)),
    # -\, 117365232 \, \sigma_5^2 \, \psi^6
    (-117365232, (0, 2, 6)),
    # +\, 102921792 \,     \sigma_5^2 \, \psi^4
    (102921792, (0, 2, 4)),
    # -\, 131926368 \, \sigma_5^2 \, \psi^2
    (-131926368, (0, 2, 2)),
    # -\, 6082272 \, \psi
    (-6082272, (0, 0, 1)),
    # +\, 22678777 \, \psi^4 \, \alpha
    (22678777, (1, 0, 4)),
    # -\,   58798343 \, \psi^5 \, \alpha
    (-58798343, (1, 0, 5)),
    # +\, 316283520 \, \sigma_5^2 \, \psi \, \alpha
    (316283520, (1, 2, 1)),
    # -\, 421440000 \, \sigma_5^2 \, \psi^2 \,     \alpha
    (-421440000, (1, 2, 2)),
    # +\, 148286280 \, \sigma_5^2 \, \psi^3 \, \alpha
    (148286280, (1, 2, 3)),
    # +\, 2458624 \, \alpha -\, 1296 \, \psi^{12} \, \alpha^2
    (2458624, (1, 0, 0)), (-1296, (2, 0, 12)),
    # -\, 324 \,     \psi^{12} \, \alpha
    (-324, (1, 0, 12)),
    # -\, 12657680 \, \psi^2 \, \alpha^2
    (-12657680, (2, 0, 2)),
    # +\, 169965 \, \psi^{10} \, \alpha
    (169965, (1, 0, 10)),
    # -\, 1834629 \, \psi^9 \, \alpha
    (-1834629, (1, 0, 9)),
    # +\,   9787591 \, \psi^8 \, \alpha
    (9787591, (1, 0, 8)),
    # -\, 30298973 \, \psi^7 \, \alpha
    (-30298973, (1, 0, 7)),
    # -\, 235980 \, \psi^{10} \, \alpha^2
    (-235980, (2, 0, 10)),
    # +\, 989292 \, \psi^9 \,    \alpha^2
    (989292, (2, 0, 9)),
    # +\, 55400808 \, \sigma_5^2 \, \psi^4 \, \alpha^2
    (55400808, (2, 2, 4)),
    # -\, 3888 \, \sigma_5^2 \, \psi^{12} \, \alpha
    (-3888, (1, 2, 12)),
    # +\, 223236 \,    \sigma_5^2 \, \psi^{11} \, \alpha
    (223236, (1, 2, 11)),
    # -\, 2725812 \, \sigma_5^2 \, \psi^{10} \, \alpha
    (-2725812, (1, 2, 10)),
    # +\, 15619428 \, \sigma_5^2 \, \psi^9 \, \alpha
    (15619428, (1, 2, 9)),
    # -\, 48491916 \, \sigma_5^2 \, \psi^8 \, \alpha
    (-48491916, (1, 2, 8)),
    # +\, 75338436 \, \sigma_5^2 \, \psi^7 \, \alpha
    (75338436, (1, 2, 7)),
    # +\, 8771448 \,   \sigma_5^2 \, \psi^6 \, \alpha^2
    (8771448, (2, 2, 6)),
    # -\, 78989568 \, \sigma_5^2 \, \alpha
    (-78989568, (1, 2, 0)),
    # -\, 6400920 \, \psi^9 -\, 56568924 \, \psi^7
    (-6400920, (0, 0, 9)), (-56568924, (0, 0, 7)),
    # +\,      24275088 \, \psi^8 +\, 3240 \, \psi^{12}
    (24275088, (0, 0, 8)), (3240, (0, 0, 12)),
    # -\, 88452 \, \psi^{11}
    (-88452, (0, 0, 11)),
    # -\, 46884384 \, \psi^5 +\, 76942908 \, \psi^6
    (-46884384, (0, 0, 5)), (76942908, (0, 0, 6)),
    # +\,       151481100 \, \sigma_5^2 \, \psi^4 \, \alpha
    (151481100, (1, 2, 4)),
    # -\, 12989436 \, \sigma_5^2 \, \psi^6 \, \alpha
    (-12989436, (1, 2, 6)),
    # -\, 141331668 \,   \sigma_5^2 \, \psi^5 \, \alpha
    (-141331668, (1, 2, 5)),
    # +\, 1015308 \, \psi^{10}
    (1015308, (0, 0, 10)),
    # -\, 77070336 \, \sigma_5^2 \,   \alpha^2 \, .
    (-77070336, (2, 2, 0)),
)
