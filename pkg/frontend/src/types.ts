/** Wire types mirroring the diagnosis service responses. */

export interface Diagnosis {
  id: string;
  label: string;
  score: number;
  threshold: number;
  model_fingerprint: string;
  timestamp: string;
}

export interface EpochPoint {
  epoch: number;
  loss: number;
  accuracy: number;
  val_accuracy?: number;
}
