# business_layer/ServingSetController.py

import numpy as np

from models import CooperationMatrix, InvariantViolation


class ServingSetController:
    """
    Business Logic Controller for the dynamic cooperation matrix
    Builds candidate serving sets from the E best APs and accounts for
    CPU-cluster changes between consecutive serving sets
    """

    def _membership(self, topo):
        """(C, M) indicator of AP m belonging to cluster c"""
        membership = np.zeros((topo.num_clusters, topo.num_aps))
        membership[topo.cluster_of, np.arange(topo.num_aps)] = 1.0
        return membership

    def candidate_matrix(self, beta, topo, E):
        """
        Candidate serving sets D' for all UEs

        Each UE is served by every AP of the clusters that contain its E
        highest-SNR APs. Equal SNRs rank the lower AP index first.

        Args:
            beta: (M, K) current SNRs
            topo: Topology with clusters
            E: number of best APs per UE, 1 <= E <= M

        Returns:
            (M, K) boolean matrix
        """
        beta = np.asarray(beta, dtype=float)
        M, K = beta.shape
        if not 1 <= E <= M:
            raise ValueError(f"E must lie in [1, {M}], got {E}")
        best = np.argsort(-beta, axis=0, kind="stable")[:E]
        selected = np.zeros((topo.num_clusters, K), dtype=bool)
        selected[topo.cluster_of[best], np.broadcast_to(np.arange(K), best.shape)] = True
        return selected[topo.cluster_of]

    def candidate_set(self, beta_col, topo, E):
        """Candidate serving column for a single UE"""
        beta_col = np.asarray(beta_col, dtype=float).reshape(-1, 1)
        return self.candidate_matrix(beta_col, topo, E)[:, 0]

    def served_clusters(self, D, topo, check=True):
        """
        Clusters used by each serving column

        Args:
            D: (M,) or (M, K) boolean serving columns
            topo: Topology with clusters
            check: raise InvariantViolation on partially served clusters

        Returns:
            (C,) or (C, K) boolean matrix
        """
        D = np.asarray(D, dtype=bool)
        counts = self._membership(topo) @ D.astype(float)
        if check:
            sizes = topo.cluster_sizes().reshape((-1,) + (1,) * (D.ndim - 1))
            partial = (counts > 0) & (counts < sizes)
            if np.any(partial):
                raise InvariantViolation("Serving column is not a union of whole clusters")
        return counts > 0

    def count_cluster_changes(self, old_col, new_col, topo):
        """
        N_k: size of the symmetric difference of the served cluster sets

        Returns:
            int for single columns, (K,) int array for matrices
        """
        old_clusters = self.served_clusters(old_col, topo)
        new_clusters = self.served_clusters(new_col, topo)
        changes = np.sum(old_clusters ^ new_clusters, axis=0)
        return int(changes) if np.ndim(changes) == 0 else changes.astype(int)

    def initial_attach(self, D_cand):
        """Cooperation matrix at t0: every UE takes its candidate set"""
        return CooperationMatrix(D=np.array(D_cand, dtype=bool), block_index=0)

    def full_cooperation(self, num_aps, num_ues):
        """Every AP serves every UE"""
        return CooperationMatrix(D=np.ones((num_aps, num_ues), dtype=bool), block_index=0)

    def apply_decision(self, D, D_cand, decisions):
        """
        Commit per-UE decisions

        Args:
            D: current CooperationMatrix
            D_cand: (M, K) candidate matrix
            decisions: (K,) booleans, True takes the candidate column

        Returns:
            new CooperationMatrix with block_index incremented
        """
        D_cand = np.asarray(D_cand, dtype=bool)
        decisions = np.asarray(decisions, dtype=bool)
        if D_cand.shape != D.D.shape or decisions.shape != (D.D.shape[1],):
            raise ValueError(
                f"Shape mismatch: D {D.D.shape}, candidate {D_cand.shape}, decisions {decisions.shape}"
            )
        new_D = np.where(decisions[None, :], D_cand, D.D)
        return CooperationMatrix(D=new_D, block_index=D.block_index + 1)
