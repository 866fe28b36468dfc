"""UR5 forward kinematics with standard DH parameters, via numpy."""
import numpy as np

D = [0.089159, 0, 0, 0.10915, 0.09465, 0.0823]
A = [0, 0.425, 0.39225, 0, 0, 0]
ALPHA = [np.pi / 2, 0, 0, np.pi / 2, -np.pi / 2, 0]


def std_dh(theta, d, a, alpha):
    ct, st, ca, sa = np.cos(theta), np.sin(theta), np.cos(alpha), np.sin(alpha)
    return np.array([[ct, -st * ca, st * sa, a * ct], [st, ct * ca, -ct * sa, a * st], [0, sa, ca, d], [0, 0, 0, 1]])


def fk(q):
    t = np.eye(4)
    for i in range(6):
        t = t @ std_dh(q[i], D[i], A[i], ALPHA[i])
    return t


def link(alpha_prev, a_prev, d, theta):
    rz = np.array([[np.cos(theta), -np.sin(theta), 0, 0], [np.sin(theta), np.cos(theta), 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    tz = np.eye(4); tz[2, 3] = d
    tx = np.eye(4); tx[0, 3] = a_prev
    rx = np.eye(4); rx[1:3, 1:3] = [[np.cos(alpha_prev), -np.sin(alpha_prev)], [np.sin(alpha_prev), np.cos(alpha_prev)]]
    return rz @ tz @ tx @ rx


np.set_printoptions(precision=17)
print("link(pi/2, 0.3, 0.2, pi/3) =", repr(link(np.pi / 2, 0.3, 0.2, np.pi / 3)[:3].tolist()))
for q in ([0.0] * 6, [0.3, -1.2, 0.8, -0.4, 1.1, 0.6], [-2.5, 0.4, 2.1, 1.7, -0.9, 3.0]):
    print(q, "->", repr(fk(q)[:3].tolist()))
