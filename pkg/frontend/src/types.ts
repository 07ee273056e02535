// Wire types for the riskreach session API. Every JSON body is camelCase;
// these mirror the server's payloads field for field.

export type HumanAction = "HA1" | "HA2";
export type RobotAction = "RA1" | "RA2";
export type BlockOrder = "ascending" | "descending" | "randomized_per_trial";

export interface ProtocolConfig {
  levels: number[];
  successesPerBlock: number;
  rounds: number;
  order: BlockOrder;
  movementWindowS: number;
  targetRadiusCm: number;
  targetDistanceCm: number;
  forceThresholdN: number;
  preGoWindowS: number;
  calibrationFactor: number;
  restBetweenBlocksS: number;
  countdownSeconds: number;
}

export interface SessionHandle {
  sessionId: string;
  config: ProtocolConfig;
}

// What the server reveals before a choice: never the robot's action.
export interface TrialInfo {
  pR: number;
  round: number;
  block: number;
  successesNeeded: number;
  countdownSeconds: number;
}

export interface ChoiceResult {
  robotAction: RobotAction;
  success: boolean;
  blockDone: boolean;
  sessionDone: boolean;
}

export interface BlockSummary {
  round: number;
  block: number;
  pR: number;
  p2: number;
  nTrials: number;
}

export interface LevelSummary {
  pR: number;
  p2: number;
  nTrials: number;
}

export interface SessionSummary {
  participantId: string;
  blocks: BlockSummary[];
  levels: LevelSummary[];
  phase: string;
}

export interface CptParams {
  alpha: number;
  beta: number;
  effortCost: number;
  determinism: number;
}

export interface BlrParams {
  intercept: number;
  slope: number;
}

export interface FitReport {
  block: number;
  cptParams: CptParams;
  cptNll: number;
  blrMap: BlrParams;
  curves: {
    cpt: [number, number][];
    blr: [number, number][];
  };
}
