// Record shapes, mirroring the service's endpoint table.

export interface SessionInfo {
  session_id: string;
  pseudonym: string;
  expires_at: string;
}

export interface CategoryRecord {
  name: string;
  reserved: boolean;
}

export interface PostRecord {
  id: string;
  kind: "post";
  category: string;
  title: string | null;
  body: string;
  pseudonym: string;
  publish_label: string;
  moderated_flag: boolean;
  net_votes: number;
  comment_count: number;
}

export interface CommentRecord {
  id: string;
  kind: "comment";
  parent: string;
  body: string;
  pseudonym: string;
  publish_label: string;
  moderated_flag: boolean;
}

export interface ThreadData {
  post: PostRecord;
  comments: CommentRecord[];
}

export interface SubmitReceipt {
  message_id: string;
  status: string;
  next_release: string;
}

export interface VoteTally {
  post_id: string;
  up: number;
  down: number;
  net: number;
}

export interface BatchRecord {
  label: string;
  released_at: string;
  message_ids: string[];
}

export type VoteValue = "approve" | "challenge";
export type ChallengeKind = "none" | "edit" | "civility" | "anonymity";
export type Outcome =
  | "publish_as_is"
  | "publish_edited"
  | "reject_civility"
  | "reject_anonymity"
  | "held";

export interface ModerationSessionRecord {
  id: string;
  target_release: string;
  moderators_present: string[];
  state: string;
  worklist_size: number;
  undecided: number;
}

export interface WorklistItem {
  id: string;
  kind: "post" | "comment";
  category: string | null;
  parent_post: string | null;
  title: string | null;
  body: string;
  pseudonym: string;
  held: boolean;
}

export interface DecisionResult {
  message_id: string;
  outcome: Outcome;
  approve_count: number;
  challenge_count: number;
}

export interface SessionSummaryRecord {
  session_id: string;
  target_release: string;
  top_posts: Array<{ post_id: string; title: string; net_votes: number }>;
  published_count: number;
  modified_count: number;
  modified_reasons: Record<string, number>;
  rejected_count: number;
  rejected_reasons: Record<string, number>;
  summary_post_id: string | null;
}
