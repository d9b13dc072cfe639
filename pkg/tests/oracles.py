"""Independent reference solutions used by the tests."""
import numpy as np
import scipy.special as sp


def eta_of(k, h):
    e = np.sqrt(complex(k) ** 2 - complex(h) ** 2)
    return -e if e.imag < 0 else e


def single_interface_tm(n, h, eps1, eps2, a, omega):
    """TM scattering amplitude of a homogeneous cylinder, from E_z / H_z potentials.

    Incident E_z = J_n(eta_1 r) e^{i n phi + i h z} outside; scattered fields
    carry H_n^(1)(eta_1 r), transmitted ones J_n(eta_2 r), in both E_z and H_z.
    Continuity of E_z, H_z, E_phi and H_phi at r = a gives four equations; the
    amplitude of the scattered E_z is returned. Transverse fields follow from
    E_t = (i/eta^2)(h grad_t E_z - omega zhat x grad_t H_z),
    H_t = (i/eta^2)(h grad_t H_z + omega eps zhat x grad_t E_z), mu = 1.
    """
    k1, k2 = np.sqrt(eps1) * omega, np.sqrt(eps2) * omega
    e1, e2 = eta_of(k1, h), eta_of(k2, h)

    def rows(Z, dZ, eta, eps):
        ephi = [(1j / eta ** 2) * h * (1j * n / a) * Z, (1j / eta ** 2) * (-omega) * eta * dZ]
        hphi = [(1j / eta ** 2) * omega * eps * eta * dZ, (1j / eta ** 2) * h * (1j * n / a) * Z]
        return np.array([[Z, 0], [0, Z], ephi, hphi], complex)

    inc = rows(sp.jv(n, e1 * a), sp.jvp(n, e1 * a), e1, eps1)[:, 0]
    sc = rows(sp.hankel1(n, e1 * a), sp.h1vp(n, e1 * a), e1, eps1)
    tr = rows(sp.jv(n, e2 * a), sp.jvp(n, e2 * a), e2, eps2)
    A = np.column_stack([sc[:, 0], sc[:, 1], -tr[:, 0], -tr[:, 1]])
    return np.linalg.solve(A, -inc)[0]
