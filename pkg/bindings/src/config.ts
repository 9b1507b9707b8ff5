// Native mappings mirroring the engine's JSON schemas key-for-key.
// Keys stay snake_case so these objects serialize directly to the documents
// the CLI consumes and produces.

export interface BetaDist {
  kind: "beta";
  alpha: number;
}

export interface FoldedNormalDist {
  kind: "folded_normal";
  mu: number;
  sigma?: number; // engine default 0.01
}

export interface FixedDist {
  kind: "fixed";
  p: number;
}

export type DistMapping = BetaDist | FoldedNormalDist | FixedDist;

export interface ModalityMapping {
  name: string;
  dist: DistMapping;
}

export interface AugmentConfigMapping {
  mode: "train" | "inference";
  master_seed: number;
  copies?: number; // engine default 1
  modalities: ModalityMapping[];
}

// One line of plans.jsonl, parsed. seq_id is the original sequence id and
// p is the exact drawn double (shortest-repr JSON round-trips doubles).
export interface PlanRecord {
  seq_id: string;
  copy: number;
  modality: string;
  p: number;
  addresses: number[];
  pi: number[];
}
