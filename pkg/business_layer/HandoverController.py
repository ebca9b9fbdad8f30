# business_layer/HandoverController.py

import logging
import math

import numpy as np

from models import ALL_SCHEMES, REFERENCE_SCHEMES, BlockInputs, Decision, OperationCounter, OptimizerInputs, SnrSnapshot


class HandoverController:
    """
    Business Logic Controller for Handover Decisions
    Dispatches the always-handover, nearOpt, FairDiff, hysteresis and UPA
    schemes behind one per-block decision interface
    """

    MAX_NEWTON_ITERS = 100
    CURVATURE_GUARD = 1e-12

    def __init__(self, dc_penalty=0.1, newton_eps=1e-6, tau_p=10, tau_c=200,
                 delta1_db=4.0, delta2_db=4.0, theta_db=4.0):
        """
        Initialize with scheme parameters

        Args:
            dc_penalty: dimensionless handover penalty d_C of the nearOpt objective
            newton_eps: Newton tolerance
            tau_p, tau_c: pilot and block length in slots
            delta1_db, delta2_db: hysteresis margins
            theta_db: UPA margin
        """
        self.dc_penalty = dc_penalty
        self.newton_eps = newton_eps
        self.tau_p = tau_p
        self.tau_c = tau_c
        self.delta1_db = delta1_db
        self.delta2_db = delta2_db
        self.theta_db = theta_db
        self.logger = self._setup_logger()

    def _setup_logger(self):
        logger = logging.getLogger('HandoverController')
        if not logger.handlers:
            handler = logging.StreamHandler()
            formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
            handler.setFormatter(formatter)
            logger.addHandler(handler)
        logger.setLevel(logging.INFO)
        return logger

    # ========== SNR TOTALS ==========

    def simplified_sinr(self, beta_col, d_col):
        """
        SINR ~ sum(D*beta) / (sum(beta) - sum(D*beta) + 1)

        Works on single columns (M,) or matrices (M, K).
        """
        beta_col = np.asarray(beta_col, dtype=float)
        served = np.sum(beta_col * np.asarray(d_col, dtype=bool), axis=0)
        total = np.sum(beta_col, axis=0)
        sinr = served / (total - served + 1.0)
        return float(sinr) if np.ndim(sinr) == 0 else sinr

    def block_inputs(self, beta_prev, beta_cur, D_prev, D_cand):
        """
        Per-UE total SNRs of the block

        s_bef: previous set at previous SNRs, s_cur: previous set at current
        SNRs, s_new: candidate set at current SNRs.
        """
        D_prev = np.asarray(D_prev, dtype=bool)
        snapshot = SnrSnapshot(
            s_bef=np.sum(beta_prev * D_prev, axis=0),
            s_cur=np.sum(beta_cur * D_prev, axis=0),
            s_new=np.sum(beta_cur * np.asarray(D_cand, dtype=bool), axis=0),
        )
        return BlockInputs(snapshot=snapshot, beta_total=np.sum(beta_cur, axis=0),
                           num_aps=int(np.shape(beta_cur)[0]))

    # ========== nearOpt ==========

    def _objective(self, x, inp, c):
        u = inp.A + x * (inp.B - inp.A) + 1.0
        return c * math.log2(u) * (1.0 - inp.d_C * x)

    def _derivative(self, x, inp, c):
        gain = inp.B - inp.A
        u = inp.A + x * gain + 1.0
        return c * (gain * (1.0 - inp.d_C * x) / (u * math.log(2.0)) - inp.d_C * math.log2(u))

    def _curvature(self, x, inp, c):
        gain = inp.B - inp.A
        u = inp.A + x * gain + 1.0
        return c * (-(gain ** 2) * (1.0 - inp.d_C * x) / (u * u * math.log(2.0))
                    - 2.0 * inp.d_C * gain / (u * math.log(2.0)))

    def _classify_monotone(self, inp, c):
        """Decision from the sign of f' at the ends of [0, 1] (f' is decreasing)"""
        if self._derivative(0.0, inp, c) <= 0.0:
            return False
        if self._derivative(1.0, inp, c) >= 0.0:
            return True
        return self._objective(1.0, inp, c) > self._objective(0.0, inp, c)

    def near_opt_decide(self, inp, epsilon=None, use_prefactor=True):
        """
        nearOpt decision for one UE

        Solves f'(x) = 0 with Newton's method from x = 0.5 for
        f(x) = ((tau_c - tau_p)/tau_c) * log2(A + x(B - A) + 1) * (1 - d_C x)
        and converts the root C: C < 0 no handover, C > 1 handover,
        otherwise C rounded to the closest integer.

        Args:
            inp: OptimizerInputs with B >= A >= 0
            epsilon: Newton tolerance, defaults to the controller setting
            use_prefactor: scale f by (tau_c - tau_p)/tau_c

        Returns:
            Decision for a single UE; relaxed_x is NaN when the decision came
            from a guard instead of a converged root
        """
        eps = self.newton_eps if epsilon is None else epsilon
        c = inp.prefactor if use_prefactor else 1.0

        def result(handover, root, iters):
            return Decision(handover=np.array([bool(handover)]),
                            relaxed_x=np.array([root]), newton_iters=iters)

        if inp.B < inp.A:
            # candidate worse than the held set
            return result(False, math.nan, 0)

        x = 0.5
        for iters in range(1, self.MAX_NEWTON_ITERS + 1):
            curvature = self._curvature(x, inp, c)
            if abs(curvature) < self.CURVATURE_GUARD:
                return result(self._derivative(0.5, inp, c) > 0.0, math.nan, iters - 1)

            x_next = x - self._derivative(x, inp, c) / curvature
            if not math.isfinite(x_next) or inp.A + x_next * (inp.B - inp.A) + 1.0 <= 0.0:
                return result(self._classify_monotone(inp, c), math.nan, iters)

            if abs(x_next - x) < eps or abs(self._derivative(x_next, inp, c)) < eps:
                root = x_next
                if root < 0.0:
                    return result(False, root, iters)
                if root > 1.0:
                    return result(True, root, iters)
                return result(root >= 0.5, root, iters)
            x = x_next

        self.logger.debug(f"Newton cap reached for A={inp.A}, B={inp.B}, d_C={inp.d_C}")
        handover = self._objective(1.0, inp, c) > self._objective(0.0, inp, c)
        return result(handover, math.nan, self.MAX_NEWTON_ITERS)

    def rounding_mismatch(self, inp, decision):
        """True when a rounded root in [0, 1] disagrees with argmax{f(0), f(1)}"""
        root = decision.relaxed_x[0]
        if not 0.0 <= root <= 1.0:
            return False
        better = self._objective(1.0, inp, 1.0) > self._objective(0.0, inp, 1.0)
        return bool(decision.handover[0]) != better

    # ========== FairDiff ==========

    def jain_index(self, s):
        """
        Jain's fairness index F = (sum s)^2 / (K * sum s^2), in [1/K, 1]

        An all-zero vector is treated as perfectly fair (F = 1).
        """
        s = np.asarray(s, dtype=float)
        K = s.shape[0]
        if K < 1:
            raise ValueError("Fairness index needs at least one UE")
        if np.any(s < 0):
            raise ValueError("Fairness index inputs must be non-negative")
        squares = float(np.sum(s * s))
        if squares == 0.0:
            self.logger.warning("All totals are zero; fairness index set to 1")
            return 1.0
        F = float(np.sum(s)) ** 2 / (K * squares)
        return min(1.0, max(1.0 / K, F))

    def fairdiff_threshold(self, s_cur, F):
        """
        alpha = ceil((1 - F) K)-th smallest current total SNR, -inf when the index is 0
        """
        s_sorted = np.sort(np.asarray(s_cur, dtype=float))
        K = s_sorted.shape[0]
        j = int(math.ceil((1.0 - F) * K - 1e-9))
        j = min(max(j, 0), K)
        if j == 0:
            return -math.inf
        return float(s_sorted[j - 1])

    def fairdiff_decide(self, snap, state):
        """
        FairDiff decision for one UE or elementwise for arrays

        Below alpha (liberal): handover iff s_new > s_cur + gamma1.
        Otherwise (strict): additionally s_cur < s_bef - gamma2.
        """
        better = snap.s_new > snap.s_cur * 10 ** (state.gamma1 / 10.0)
        degraded = snap.s_cur < snap.s_bef * 10 ** (-state.gamma2 / 10.0)
        liberal = snap.s_cur < state.alpha
        return np.where(liberal, better, better & degraded)

    def refresh_fairdiff(self, s_cur, state):
        """Recompute F and alpha when the update period has elapsed; returns True on refresh"""
        if state.blocks_since_update is not None and state.blocks_since_update < state.update_period:
            return False
        state.F = self.jain_index(s_cur)
        state.alpha = self.fairdiff_threshold(s_cur, state.F)
        state.blocks_since_update = 0
        state.refreshes += 1
        return True

    # ========== MARGIN BASELINES ==========

    def hysteresis_decide(self, snap, delta1, delta2):
        """Handover iff s_new > s_bef + delta1 and s_cur < s_bef - delta2 (dB margins)"""
        return (snap.s_new > snap.s_bef * 10 ** (delta1 / 10.0)) & \
               (snap.s_cur < snap.s_bef * 10 ** (-delta2 / 10.0))

    def upa_decide(self, snap, theta):
        """Handover iff s_cur < s_bef - theta (dB margin)"""
        return snap.s_cur < snap.s_bef * 10 ** (-theta / 10.0)

    # ========== DISPATCH ==========

    def decide_block(self, scheme, inputs, state=None, counter=None, first_block=False):
        """
        Per-UE decisions of one scheme for one block

        The reference cases fullcf and nohandover never hand over after the
        attach block.

        Args:
            scheme: scheme id
            inputs: BlockInputs of the block
            state: FairDiffState (fairdiff only)
            counter: optional OperationCounter receiving the scheme's operations
            first_block: initial attach at t0, every UE takes its candidate set

        Returns:
            Decision
        """
        if scheme not in ALL_SCHEMES:
            raise ValueError(f"Unknown scheme '{scheme}' (valid: {', '.join(ALL_SCHEMES)})")
        counter = counter if counter is not None else OperationCounter()
        K = inputs.num_ues
        M = inputs.num_aps
        snap = inputs.snapshot

        if first_block or scheme == "always":
            return Decision(handover=np.ones(K, dtype=bool))

        if scheme in REFERENCE_SCHEMES:
            return Decision(handover=np.zeros(K, dtype=bool))

        if scheme == "nearopt":
            A = inputs.sinr_before
            B = inputs.sinr_after
            handover = np.zeros(K, dtype=bool)
            relaxed = np.full(K, math.nan)
            iters = 0
            for k in range(K):
                inp = self._optimizer_inputs(A[k], B[k])
                single = self.near_opt_decide(inp)
                handover[k] = single.handover[0]
                relaxed[k] = single.relaxed_x[0]
                iters += single.newton_iters
                if 0.0 <= relaxed[k] <= 1.0:
                    counter.add("rounded_roots")
                    if self.rounding_mismatch(inp, single):
                        counter.add("rounding_mismatches")
            self._count_sums(counter, K, M, 3)
            counter.add("newton_iterations", iters)
            return Decision(handover=handover, relaxed_x=relaxed, newton_iters=iters)

        if scheme == "fairdiff":
            if state is None:
                raise ValueError("FairDiff needs a FairDiffState")
            self._count_sums(counter, K, M, 3)
            if self.refresh_fairdiff(snap.s_cur, state):
                counter.add("fairness_evaluations")
                counter.add("fairness_terms", K * M)
            handover = self.fairdiff_decide(snap, state)
            state.blocks_since_update += 1
            return Decision(handover=np.asarray(handover, dtype=bool),
                            liberal=np.asarray(snap.s_cur < state.alpha))

        if scheme == "hysteresis":
            self._count_sums(counter, K, M, 3)
            return Decision(handover=np.asarray(
                self.hysteresis_decide(snap, self.delta1_db, self.delta2_db), dtype=bool))

        self._count_sums(counter, K, M, 2)
        return Decision(handover=np.asarray(self.upa_decide(snap, self.theta_db), dtype=bool))

    def _optimizer_inputs(self, A, B):
        return OptimizerInputs(A=float(A), B=float(B), d_C=self.dc_penalty,
                               tau_p=self.tau_p, tau_c=self.tau_c)

    def _count_sums(self, counter, K, M, sums_per_ue):
        counter.add("decisions", K)
        counter.add("snr_sums", sums_per_ue * K)
        counter.add("snr_terms", sums_per_ue * K * M)
